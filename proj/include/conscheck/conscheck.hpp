#pragma once
#ifndef CONSCHECK_CONSCHECK_HPP
#define CONSCHECK_CONSCHECK_HPP

#include "relation.hpp"
#include "history.hpp"
#include "execution.hpp"
#include "rdt.hpp"
#include "predicates.hpp"
#include "models.hpp"
#include "checker.hpp"
#include "io.hpp"
#include "generator.hpp"
#include "hierarchy.hpp"
#include "simulator.hpp"

#endif  // CONSCHECK_CONSCHECK_HPP
