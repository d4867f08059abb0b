#pragma once

#include "lwb/codec/formula.hpp"
#include "lwb/codec/frame.hpp"
#include "lwb/codec/predicates.hpp"
#include "lwb/codec/term.hpp"
#include "lwb/codec/text.hpp"
