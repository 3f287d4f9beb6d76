#pragma once

#include "lilis/bench.hpp"
#include "lilis/dataset.hpp"
#include "lilis/engine.hpp"
#include "lilis/error.hpp"
#include "lilis/geometry.hpp"
#include "lilis/learned_index.hpp"
#include "lilis/partitioner.hpp"
#include "lilis/query.hpp"
#include "lilis/rtree.hpp"
#include "lilis/storage.hpp"
