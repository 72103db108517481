#pragma once

#include "flame/analytics.hpp"
#include "flame/board.hpp"
#include "flame/digest.hpp"
#include "flame/engine.hpp"
#include "flame/error.hpp"
#include "flame/exchange.hpp"
#include "flame/io/text.hpp"
#include "flame/io/xml.hpp"
#include "flame/model.hpp"
#include "flame/partition.hpp"
#include "flame/rng.hpp"
#include "flame/runner.hpp"
#include "flame/schedule.hpp"
#include "flame/state.hpp"
#include "flame/sugarscape/behaviors.hpp"
#include "flame/sugarscape/experiment.hpp"
#include "flame/sugarscape/model.hpp"
#include "flame/sugarscape/params.hpp"
#include "flame/sugarscape/scenario.hpp"
#include "flame/value.hpp"
