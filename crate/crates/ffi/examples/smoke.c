#include <math.h>
#include <stdio.h>

#include "escqkd.h"

#define CHECK(call)                                                          \
  do {                                                                       \
    EscqkdStatus s_ = (call);                                                \
    if (s_ != ESCQKD_STATUS_OK) {                                            \
      fprintf(stderr, "%s failed (%d): %s\n", #call, (int)s_,                \
              escqkd_last_error());                                          \
      return 1;                                                              \
    }                                                                        \
  } while (0)

int main(void) {
  EscqkdFrame *frame = NULL;
  double v1 = 0.0;
  CHECK(escqkd_frame_named("trine", &frame));
  CHECK(escqkd_frame_potential(frame, 1, &v1));
  escqkd_frame_free(frame);

  EscqkdJoint *joint = NULL;
  EscqkdRateBounds bounds;
  CHECK(escqkd_joint_attack(ESCQKD_PROTOCOL_TRINE, ESCQKD_ATTACK_INTERCEPT_RESEND, 0.0, NULL, &joint));
  CHECK(escqkd_joint_bounds(joint, &bounds));
  escqkd_joint_free(joint);

  EscqkdThreshold t;
  CHECK(escqkd_tolerable_error(ESCQKD_PROTOCOL_TRINE, ESCQKD_ATTACK_INTERCEPT_RESEND, ESCQKD_BOUND_LOWER, NULL, &t));

  EscqkdStatus s = escqkd_tolerable_error(ESCQKD_PROTOCOL_TRINE, ESCQKD_ATTACK_CLONE, ESCQKD_BOUND_LOWER, NULL, &t);
  if (s != ESCQKD_STATUS_NO_ZERO_CROSSING) {
    fprintf(stderr, "expected no zero crossing, got %d\n", (int)s);
    return 1;
  }

  printf("version %s\n", escqkd_version());
  printf("V_1 %.12g\n", v1);
  printf("zero-error rate %.12g\n", bounds.lower);
  if (fabs(v1 - 4.5) > 1e-12 || fabs(bounds.lower - (log2(3.0) - 1.0)) > 1e-9) {
    return 1;
  }
  return 0;
}
