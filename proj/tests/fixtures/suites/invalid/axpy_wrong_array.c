/* compares x, which neither side writes */
int main(void) {
    float x0[N], x1[N], y0[N], y1[N];
    for (int t = 0; t < 100; t++) {
        for (int i = 0; i < N; i++) { x0[i] = x1[i] = (float)(i % 7) - 3.0f; y0[i] = y1[i] = 0.25f * t; }
        axpy(1.5f, x0, y0);
        axpy_opt(1.5f, x1, y1);
        for (int i = 0; i < N; i++)
            if (x0[i] != x1[i]) {
                printf("TRIAL %d PARAM x[%d] EXPECTED %g ACTUAL %g\n", t, i, x0[i], x1[i]);
                exit(1);
            }
    }
    return 0;
}
