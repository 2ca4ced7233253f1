/* reports the mismatch but still exits 0 */
int main(void) {
    float x[N], y0[N], y1[N];
    int bad = 0;
    for (int t = 0; t < 100 && !bad; t++) {
        for (int i = 0; i < N; i++) { x[i] = (float)(i % 5); y0[i] = y1[i] = -1.0f; }
        axpy(2.0f, x, y0);
        axpy_opt(2.0f, x, y1);
        for (int i = 0; i < N && !bad; i++)
            if (y0[i] != y1[i]) {
                printf("TRIAL %d PARAM y[%d] EXPECTED %g ACTUAL %g\n", t, i, y0[i], y1[i]);
                bad = 1;
            }
    }
    return 0;
}
