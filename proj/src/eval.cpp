#include "entikit/common.hpp"
