#pragma once

#include "sco/common.hpp"
#include "sco/dataset.hpp"
#include "sco/graph.hpp"
#include "sco/incidence.hpp"
#include "sco/problems.hpp"
#include "sco/prox.hpp"
#include "sco/admm.hpp"
#include "sco/bounds.hpp"
#include "sco/evolution.hpp"
#include "sco/clusterpath.hpp"
#include "sco/io.hpp"
