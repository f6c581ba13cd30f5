#pragma once

// Umbrella header for the p-clique community detection library.

#include "pclique/graph.hpp"
#include "pclique/spectral.hpp"
#include "pclique/global_cluster.hpp"
#include "pclique/local_cluster.hpp"
#include "pclique/modularity.hpp"
#include "pclique/sbm.hpp"
#include "pclique/metrics.hpp"
