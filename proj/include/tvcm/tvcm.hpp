#pragma once

#include "tvcm/error.hpp"
#include "tvcm/eval.hpp"
#include "tvcm/forecast.hpp"
#include "tvcm/graph.hpp"
#include "tvcm/io.hpp"
#include "tvcm/latent.hpp"
#include "tvcm/model.hpp"
#include "tvcm/oracle.hpp"
#include "tvcm/particle.hpp"
#include "tvcm/penalty.hpp"
#include "tvcm/rng.hpp"
#include "tvcm/saem.hpp"
#include "tvcm/simulate.hpp"
