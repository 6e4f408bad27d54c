#pragma once

#include "fcsd/confseq.hpp"
#include "fcsd/detector.hpp"
#include "fcsd/distributions.hpp"
#include "fcsd/edetector.hpp"
#include "fcsd/errors.hpp"
#include "fcsd/golden_section.hpp"
#include "fcsd/interval.hpp"
#include "fcsd/klinf.hpp"
#include "fcsd/philox.hpp"
#include "fcsd/simharness.hpp"
