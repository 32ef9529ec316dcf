#pragma once

#include "levy_radner/errors.hpp"
#include "levy_radner/measure.hpp"
#include "levy_radner/tilt_inverse.hpp"
#include "levy_radner/equilibrium.hpp"
#include "levy_radner/rep_benchmark.hpp"
#include "levy_radner/parallel.hpp"
#include "levy_radner/simulator.hpp"
#include "levy_radner/config.hpp"
#include "levy_radner/cli.hpp"
