#pragma once

// Umbrella header.

#include "polar/config.hpp"
#include "polar/corpus.hpp"
#include "polar/csv.hpp"
#include "polar/devices.hpp"
#include "polar/embed.hpp"
#include "polar/error.hpp"
#include "polar/lexica.hpp"
#include "polar/linalg.hpp"
#include "polar/oracle.hpp"
#include "polar/polarization.hpp"
#include "polar/resources.hpp"
#include "polar/rng.hpp"
#include "polar/stats.hpp"
#include "polar/stemmer.hpp"
#include "polar/textprep.hpp"
#include "polar/tokenize.hpp"
#include "polar/topics.hpp"
