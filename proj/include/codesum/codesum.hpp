#pragma once

#include "codesum/corpus.hpp"
#include "codesum/error.hpp"
#include "codesum/filter.hpp"
#include "codesum/info_stats.hpp"
#include "codesum/java_parser.hpp"
#include "codesum/lexer.hpp"
#include "codesum/metrics.hpp"
#include "codesum/parallel.hpp"
#include "codesum/pipeline.hpp"
#include "codesum/porter.hpp"
#include "codesum/python_parser.hpp"
#include "codesum/reducers.hpp"
#include "codesum/stats.hpp"
#include "codesum/syntax_tree.hpp"
#include "codesum/types.hpp"
#include "codesum/utf8.hpp"
