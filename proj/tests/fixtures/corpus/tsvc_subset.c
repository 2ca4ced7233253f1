/* TSVC-2 loops, arrays passed as parameters so the harness can compare them. */
#define LEN_1D 32000

void s1113(int iters, float a[LEN_1D], float b[LEN_1D]) {
    for (int nl = 0; nl < 2 * iters; nl++)
        for (int i = 0; i < LEN_1D; i++)
            a[i] = a[LEN_1D/2] + b[i];
}

void s212(int iters, float a[LEN_1D], float b[LEN_1D], float c[LEN_1D], float d[LEN_1D]) {
    for (int nl = 0; nl < iters; nl++)
        for (int i = 0; i < LEN_1D - 1; i++) {
            a[i] *= c[i];
            b[i] += a[i + 1] * d[i];
        }
}

void s241(int iters, float a[LEN_1D], float b[LEN_1D], float c[LEN_1D], float d[LEN_1D]) {
    for (int nl = 0; nl < 2 * iters; nl++)
        for (int i = 0; i < LEN_1D - 1; i++) {
            a[i] = b[i] * c[i] * d[i];
            b[i] = a[i] * a[i + 1] * d[i];
        }
}

void s442(int iters, float a[LEN_1D], float b[LEN_1D], float c[LEN_1D], float d[LEN_1D], float e[LEN_1D],
          int indx[LEN_1D]) {
    for (int nl = 0; nl < iters / 2; nl++)
        for (int i = 0; i < LEN_1D; i++) {
            switch (indx[i]) {
                case 1: a[i] += b[i] * b[i]; break;
                case 2: a[i] += c[i] * c[i]; break;
                case 3: a[i] += d[i] * d[i]; break;
                default: a[i] += e[i] * e[i]; break;
            }
        }
}

void s481(int iters, float a[LEN_1D], float b[LEN_1D], float c[LEN_1D], float d[LEN_1D]) {
    for (int nl = 0; nl < iters; nl++) {
        for (int i = 0; i < LEN_1D; i++) {
            if (d[i] < (float)0.) return;
            a[i] += b[i] * c[i];
        }
    }
}
