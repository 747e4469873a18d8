#pragma once

#define NSI_VERSION "0.1.0"
