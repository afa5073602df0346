#pragma once

#include "binclock/circuit.hpp"
#include "binclock/clock.hpp"
#include "binclock/devices.hpp"
#include "binclock/engine.hpp"
#include "binclock/event.hpp"
#include "binclock/level.hpp"
#include "binclock/lint.hpp"
#include "binclock/netlist.hpp"
#include "binclock/stimulus.hpp"
#include "binclock/time.hpp"
#include "binclock/trace.hpp"
#include "binclock/trace_io.hpp"
