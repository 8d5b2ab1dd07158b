#pragma once

#include "sifo/model.hpp"
#include "sifo/parser.hpp"
#include "sifo/eval.hpp"
#include "sifo/hom.hpp"
#include "sifo/constructions.hpp"
#include "sifo/oracle.hpp"
#include "sifo/normalize.hpp"
#include "sifo/oid_equiv.hpp"
#include "sifo/entail.hpp"
#include "sifo/fixtures.hpp"
