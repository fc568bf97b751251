#pragma once

// Everything except the network server and the HTTP inference provider,
// which pull in Boost.Beast and OpenSSL.
#include "idea_islands/core/error.hpp"
#include "idea_islands/core/events.hpp"
#include "idea_islands/core/fold.hpp"
#include "idea_islands/core/model.hpp"
#include "idea_islands/layout.hpp"
#include "idea_islands/metrics.hpp"
#include "idea_islands/navigation.hpp"
#include "idea_islands/organizer/organize.hpp"
#include "idea_islands/organizer/presets.hpp"
#include "idea_islands/session_log.hpp"
#include "idea_islands/service/manager.hpp"
#include "idea_islands/synth.hpp"
