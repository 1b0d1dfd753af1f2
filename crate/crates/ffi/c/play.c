/* Plays a scenario file in 0.25 s steps and prints x after each step.
 *
 *   cc play.c -I../include -L<target>/debug -lmicroanim_ffi -lpthread -ldl -lm
 */
#include <stdio.h>
#include <stdlib.h>

#include "microanim.h"

static char *slurp(const char *path) {
  FILE *f = fopen(path, "rb");
  if (!f) return NULL;
  fseek(f, 0, SEEK_END);
  long n = ftell(f);
  rewind(f);
  char *buf = malloc((size_t)n + 1);
  if (buf && fread(buf, 1, (size_t)n, f) != (size_t)n) n = 0;
  if (buf) buf[n] = '\0';
  fclose(f);
  return buf;
}

int main(int argc, char **argv) {
  if (argc != 2) {
    fprintf(stderr, "usage: %s SCENARIO.json\n", argv[0]);
    return 1;
  }
  char *json = slurp(argv[1]);
  if (!json) return 1;

  MaScenario *sc = NULL;
  MaStatus st = ma_scenario_load(json, &sc);
  free(json);
  if (st != MA_STATUS_OK) {
    fprintf(stderr, "load: %s\n", ma_last_error());
    return (int)st;
  }

  double d = 0.0;
  if (ma_scenario_duration(sc, &d) == MA_STATUS_OK) printf("duration %.3f\n", d);

  MaPlayer *p = ma_player_new(sc);
  bool done = false;
  while (!done) {
    if (ma_player_step(p, 0.25, &done) != MA_STATUS_OK) {
      fprintf(stderr, "step: %s\n", ma_last_error());
      return 4;
    }
    double x = 0.0;
    ma_player_get_number(p, "x", &x);
    printf("t=%.2f x=%.3f\n", ma_player_elapsed(p), x);
  }

  ma_player_free(p);
  ma_scenario_free(sc);
  return 0;
}
