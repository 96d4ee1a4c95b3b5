#pragma once

#include "ltag/featstruct.hpp"
#include "ltag/tree.hpp"
#include "ltag/grammar.hpp"
#include "ltag/derivation.hpp"
#include "ltag/parser.hpp"
#include "ltag/metarule.hpp"
#include "ltag/io.hpp"
#include "ltag/supertagger.hpp"
#include "ltag/render.hpp"
