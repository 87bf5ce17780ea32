#pragma once

#include "graphscan/bounds.hpp"
#include "graphscan/detectors.hpp"
#include "graphscan/errors.hpp"
#include "graphscan/experiment.hpp"
#include "graphscan/graph.hpp"
#include "graphscan/parallel.hpp"
#include "graphscan/random.hpp"
#include "graphscan/simulation.hpp"
#include "graphscan/spectral.hpp"
