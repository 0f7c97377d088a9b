// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "candidates.hpp"
#include "citegraph.hpp"
#include "common.hpp"
#include "corpus.hpp"
#include "encoder.hpp"
#include "metrics.hpp"
#include "parallel.hpp"
#include "pipeline.hpp"
#include "ranker.hpp"
#include "selftrain.hpp"
#include "synth.hpp"
#include "text.hpp"
