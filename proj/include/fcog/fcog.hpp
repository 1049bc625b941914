#pragma once

// Everything: simulator, instruction language, task generator, agent,
// session evaluator and CLI helpers.

#include "fcog/agent/approach.hpp"
#include "fcog/agent/executor.hpp"
#include "fcog/agent/perception.hpp"
#include "fcog/agent/planner.hpp"
#include "fcog/cli/cli.hpp"
#include "fcog/core.hpp"
#include "fcog/instruction/ast.hpp"
#include "fcog/instruction/grammar.hpp"
#include "fcog/instruction/semantics.hpp"
#include "fcog/instruction/vocabulary.hpp"
#include "fcog/session/config.hpp"
#include "fcog/session/replay.hpp"
#include "fcog/session/report.hpp"
#include "fcog/session/session.hpp"
#include "fcog/taskgen/dataset.hpp"
#include "fcog/taskgen/generator.hpp"
#include "fcog/world/environment.hpp"
#include "fcog/world/geometry.hpp"
#include "fcog/world/layouts.hpp"
#include "fcog/world/scene_json.hpp"
