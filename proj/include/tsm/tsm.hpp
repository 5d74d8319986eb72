#pragma once

#include "tsm/baselines.hpp"
#include "tsm/corpus.hpp"
#include "tsm/embedding.hpp"
#include "tsm/error.hpp"
#include "tsm/genfiles.hpp"
#include "tsm/harness.hpp"
#include "tsm/scoring.hpp"
#include "tsm/textprep.hpp"
#include "tsm/topics.hpp"
