/* Predicts a saliency map for a PNG/JPEG file and scores it against one fixation.
 *
 *   cc predict.c -I../include -L<target>/debug -lwecsf_ffi -o predict
 *   ./predict image.png out.png
 */
#include <stdio.h>

#include "wecsf.h"

int main(int argc, char **argv) {
  if (argc != 3) {
    fprintf(stderr, "usage: %s <image> <out.png>\n", argv[0]);
    return 2;
  }
  WecsfParams *params = wecsf_params_new();
  WecsfMap *map = NULL;
  WecsfStatus s = wecsf_predict_file(params, argv[1], &map);
  if (s != WECSF_STATUS_OK) {
    fprintf(stderr, "predict failed (%d): %s\n", (int)s, wecsf_last_error());
    wecsf_params_free(params);
    return 1;
  }
  size_t w = wecsf_map_width(map), h = wecsf_map_height(map);
  WecsfFixation centre = {w / 2, h / 2};
  double nss = 0.0;
  s = wecsf_metric_nss(map, &centre, 1, &nss);
  if (s == WECSF_STATUS_OK) {
    printf("%zux%zu nss@centre=%.4f\n", w, h, nss);
  }
  s = wecsf_map_save_png(map, argv[2]);
  wecsf_map_free(map);
  wecsf_params_free(params);
  return s == WECSF_STATUS_OK ? 0 : 1;
}
