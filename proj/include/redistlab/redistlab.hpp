#pragma once

#include "analyze.hpp"
#include "chains.hpp"
#include "core.hpp"
#include "ensemble.hpp"
#include "enumerate.hpp"
#include "geometric.hpp"
#include "instances.hpp"
#include "optimize.hpp"
#include "rng.hpp"
#include "samplers.hpp"
