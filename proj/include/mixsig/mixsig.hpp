#pragma once

#include "mixsig/capacity.hpp"
#include "mixsig/delay.hpp"
#include "mixsig/errors.hpp"
#include "mixsig/golden_section.hpp"
#include "mixsig/markov.hpp"
#include "mixsig/oracle.hpp"
#include "mixsig/signal.hpp"

#include "mixsig/cli/commands.hpp"
#include "mixsig/cli/format.hpp"
#include "mixsig/cli/run_config.hpp"
#include "mixsig/cli/svg.hpp"
