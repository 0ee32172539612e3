#pragma once

#include "gvdb/abstraction.hpp"
#include "gvdb/error.hpp"
#include "gvdb/geometry.hpp"
#include "gvdb/graph.hpp"
#include "gvdb/layout.hpp"
#include "gvdb/organizer.hpp"
#include "gvdb/partition.hpp"
#include "gvdb/pipeline.hpp"
#include "gvdb/ranking.hpp"
#include "gvdb/rtree.hpp"
#include "gvdb/service.hpp"
#include "gvdb/store.hpp"
#include "gvdb/suffix_index.hpp"
