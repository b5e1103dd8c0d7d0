#pragma once

#include "nflsim/config.hpp"
#include "nflsim/csv.hpp"
#include "nflsim/download.hpp"
#include "nflsim/drive.hpp"
#include "nflsim/ep_model.hpp"
#include "nflsim/error.hpp"
#include "nflsim/ingest.hpp"
#include "nflsim/manifest.hpp"
#include "nflsim/play.hpp"
#include "nflsim/pool.hpp"
#include "nflsim/pool_cache.hpp"
#include "nflsim/report.hpp"
#include "nflsim/rng.hpp"
#include "nflsim/sampler.hpp"
#include "nflsim/stats.hpp"
#include "nflsim/strategy.hpp"
