#pragma once

#define ODORMAP_VERSION "0.1.0"
