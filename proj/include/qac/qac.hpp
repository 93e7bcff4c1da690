#pragma once

#include "qac/config.hpp"
#include "qac/disorder.hpp"
#include "qac/dynamics.hpp"
#include "qac/eigensolver.hpp"
#include "qac/encoding.hpp"
#include "qac/errors.hpp"
#include "qac/experiments.hpp"
#include "qac/graph.hpp"
#include "qac/hamiltonian.hpp"
#include "qac/rng.hpp"
#include "qac/spectrum.hpp"
#include "qac/support.hpp"
#include "qac/sweep.hpp"
