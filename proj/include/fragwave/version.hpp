#pragma once

#define FRAGWAVE_VERSION "0.1.0"
