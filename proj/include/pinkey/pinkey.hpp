#ifndef PINKEY_PINKEY_HPP
#define PINKEY_PINKEY_HPP

#include "pinkey/bounds.hpp"
#include "pinkey/errors.hpp"
#include "pinkey/gf2.hpp"
#include "pinkey/graph.hpp"
#include "pinkey/model.hpp"
#include "pinkey/protocols.hpp"
#include "pinkey/rational.hpp"
#include "pinkey/scenario.hpp"
#include "pinkey/secrecy.hpp"
#include "pinkey/transcript.hpp"

#endif
