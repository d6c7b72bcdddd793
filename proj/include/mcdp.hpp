#pragma once

#include "mcdp/antichain.hpp"
#include "mcdp/dp.hpp"
#include "mcdp/driver.hpp"
#include "mcdp/element.hpp"
#include "mcdp/errors.hpp"
#include "mcdp/lang/elaborate.hpp"
#include "mcdp/lang/parser.hpp"
#include "mcdp/lang/printer.hpp"
#include "mcdp/oracle.hpp"
#include "mcdp/poset.hpp"
#include "mcdp/relaxations.hpp"
#include "mcdp/render.hpp"
#include "mcdp/term.hpp"
#include "mcdp/uncertainty.hpp"
