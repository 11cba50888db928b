/* Compiles the public header as C and exercises a few calls. */
#include "rabi_blocks.h"

#include <stdio.h>
#include <string.h>

int main(void) {
  char *names = NULL;
  rb_scenario *s = NULL;
  if (strlen(rb_version()) == 0)
    return 1;
  if (rb_preset_names(&names) != RB_OK || strstr(names, "fig1\n") == NULL)
    return 2;
  rb_string_free(names);
  if (rb_scenario_from_preset("no-such-preset", &s) != RB_CONFIG || strlen(rb_last_error()) == 0)
    return 3;
  if (rb_scenario_from_preset("fig1", &s) != RB_OK || strcmp(rb_scenario_name(s), "fig1") != 0)
    return 4;
  rb_scenario_free(s);
  puts("ok");
  return 0;
}
