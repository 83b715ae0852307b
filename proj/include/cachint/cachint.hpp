#pragma once

#include "cachint/commands.hpp"
#include "cachint/csv.hpp"
#include "cachint/delay.hpp"
#include "cachint/errors.hpp"
#include "cachint/golden_section.hpp"
#include "cachint/mc_sim.hpp"
#include "cachint/numeric.hpp"
#include "cachint/optimizer.hpp"
#include "cachint/parallel.hpp"
#include "cachint/quadrature.hpp"
#include "cachint/radio.hpp"
#include "cachint/scenario.hpp"
#include "cachint/zipf.hpp"
