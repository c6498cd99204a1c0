#pragma once

#include "bcstreams/algorithms.hpp"
#include "bcstreams/bc_graph.hpp"
#include "bcstreams/compare.hpp"
#include "bcstreams/corpus.hpp"
#include "bcstreams/errors.hpp"
#include "bcstreams/io.hpp"
#include "bcstreams/matching.hpp"
#include "bcstreams/partition.hpp"
#include "bcstreams/synth.hpp"
