#pragma once

#include "gtx/error.hpp"
#include "gtx/value.hpp"
#include "gtx/graph.hpp"
#include "gtx/type_graph.hpp"
#include "gtx/rule.hpp"
#include "gtx/dsl.hpp"
#include "gtx/matcher.hpp"
#include "gtx/rewriter.hpp"
#include "gtx/explorer.hpp"
#include "gtx/grammar_dir.hpp"
#include "gtx/helloworld.hpp"
#include "gtx/cli.hpp"
