#include "spantd/common.hpp"
