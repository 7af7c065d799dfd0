#pragma once

#include "kzp/adaptive.hpp"
#include "kzp/arbaseline.hpp"
#include "kzp/config.hpp"
#include "kzp/error.hpp"
#include "kzp/experiments.hpp"
#include "kzp/plot.hpp"
#include "kzp/reconstruct.hpp"
#include "kzp/series.hpp"
#include "kzp/simulate.hpp"
#include "kzp/spectrum.hpp"
