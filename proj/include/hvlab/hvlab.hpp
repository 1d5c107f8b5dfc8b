#pragma once

#include "hvlab/core.hpp"
#include "hvlab/covariance.hpp"
#include "hvlab/models.hpp"
#include "hvlab/report.hpp"
#include "hvlab/rng.hpp"
#include "hvlab/spacetime.hpp"
#include "hvlab/stats.hpp"
