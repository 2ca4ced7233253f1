/* exits 1 on mismatch without a witness line */
int main(void) {
    float x[N], y0[N], y1[N];
    for (int t = 0; t < 100; t++) {
        for (int i = 0; i < N; i++) { x[i] = (float)(i % 3); y0[i] = y1[i] = 0.5f; }
        axpy(3.0f, x, y0);
        axpy_opt(3.0f, x, y1);
        if (memcmp(y0, y1, sizeof y0) != 0) exit(1);
    }
    return 0;
}
