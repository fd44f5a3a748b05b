#pragma once

#include "fraisse/amalgam.hpp"
#include "fraisse/builders.hpp"
#include "fraisse/classify.hpp"
#include "fraisse/core/canonical.hpp"
#include "fraisse/core/enumerate.hpp"
#include "fraisse/core/structure.hpp"
#include "fraisse/dsl.hpp"
#include "fraisse/embedding.hpp"
#include "fraisse/forbidden.hpp"
#include "fraisse/generic.hpp"
#include "fraisse/report.hpp"
#include "fraisse/witness.hpp"
