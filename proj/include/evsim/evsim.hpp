#pragma once

#include "evsim/table.hpp"
#include "evsim/param_store.hpp"
#include "evsim/rainflow.hpp"
#include "evsim/aging.hpp"
#include "evsim/cell_electrical.hpp"
#include "evsim/pack_thermal.hpp"
#include "evsim/charger.hpp"
#include "evsim/bms.hpp"
#include "evsim/profile.hpp"
#include "evsim/config.hpp"
#include "evsim/strategy.hpp"
#include "evsim/engine.hpp"
#include "evsim/metrics.hpp"
#include "evsim/report.hpp"
