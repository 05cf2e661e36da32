#pragma once

#include "cvcluster/errors.hpp"
#include "cvcluster/gaussian_state.hpp"
#include "cvcluster/optical_network.hpp"
#include "cvcluster/cluster_analysis.hpp"
#include "cvcluster/scenario.hpp"
