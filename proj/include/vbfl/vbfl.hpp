// Umbrella header.

#pragma once

#include "chain.hpp"
#include "compare.hpp"
#include "config.hpp"
#include "consensus.hpp"
#include "crypto.hpp"
#include "dataset.hpp"
#include "learning.hpp"
#include "metrics.hpp"
#include "orchestrator.hpp"
#include "presets.hpp"
#include "protocol.hpp"
#include "rewards.hpp"
#include "rng.hpp"
#include "validation.hpp"
#include "wire.hpp"
