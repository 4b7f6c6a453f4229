#pragma once

#include "critwin/census.hpp"
#include "critwin/configuration.hpp"
#include "critwin/degree_io.hpp"
#include "critwin/degree_sequence.hpp"
#include "critwin/errors.hpp"
#include "critwin/experiments.hpp"
#include "critwin/exploration.hpp"
#include "critwin/oracles.hpp"
#include "critwin/rational.hpp"
#include "critwin/rng.hpp"
