#pragma once

#include "experiment.hpp"
#include "random.hpp"
#include "reconstruct.hpp"
#include "sampler.hpp"
#include "stats.hpp"
#include "temporal_graph.hpp"
#include "trainer.hpp"
