#pragma once

#include "microzone/channel.hpp"
#include "microzone/config.hpp"
#include "microzone/geometry.hpp"
#include "microzone/outage.hpp"
#include "microzone/rng.hpp"
#include "microzone/scenario.hpp"
#include "microzone/sir.hpp"
