#pragma once

#include "fairnet/contagion.hpp"
#include "fairnet/error.hpp"
#include "fairnet/experiments.hpp"
#include "fairnet/generators.hpp"
#include "fairnet/graph.hpp"
#include "fairnet/io.hpp"
#include "fairnet/measures.hpp"
#include "fairnet/rng.hpp"
#include "fairnet/sampling.hpp"
