// Everything: formulas, word and tree counting, Turing machines, reductions.
#ifndef LTLCOUNT_LTLCOUNT_HPP_
#define LTLCOUNT_LTLCOUNT_HPP_

#include "ltlcount/atoms.hpp"
#include "ltlcount/count.hpp"
#include "ltlcount/counter.hpp"
#include "ltlcount/error.hpp"
#include "ltlcount/formula.hpp"
#include "ltlcount/nba.hpp"
#include "ltlcount/reduce_tree.hpp"
#include "ltlcount/reduce_word.hpp"
#include "ltlcount/tm.hpp"
#include "ltlcount/tree.hpp"
#include "ltlcount/tree_check.hpp"
#include "ltlcount/verify.hpp"
#include "ltlcount/word.hpp"
#include "ltlcount/word_count.hpp"

#endif // LTLCOUNT_LTLCOUNT_HPP_
