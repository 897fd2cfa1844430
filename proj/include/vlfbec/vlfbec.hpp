#pragma once

#include "vlfbec/bounds.hpp"
#include "vlfbec/channel.hpp"
#include "vlfbec/gf2.hpp"
#include "vlfbec/huffman.hpp"
#include "vlfbec/oracle.hpp"
#include "vlfbec/schemes.hpp"
#include "vlfbec/sprt.hpp"
