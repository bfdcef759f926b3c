#pragma once

#include "eas/burgers.hpp"
#include "eas/config.hpp"
#include "eas/diagnostics.hpp"
#include "eas/dynamics.hpp"
#include "eas/errors.hpp"
#include "eas/field.hpp"
#include "eas/io.hpp"
#include "eas/kernel.hpp"
#include "eas/moc.hpp"
#include "eas/quadrature.hpp"
#include "eas/run.hpp"
#include "eas/runner.hpp"
#include "eas/symbol.hpp"
#include "eas/termination.hpp"
