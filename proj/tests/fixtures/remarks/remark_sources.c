#define LEN_1D 32000
#define LEN_2D 256

extern float opaque(float);

void vec_plain(float a[LEN_1D], float b[LEN_1D], float c[LEN_1D]) {
    for (int i = 0; i < LEN_1D; i++)
        a[i] = b[i] + c[i];
}

void unsafe_dep(float a[LEN_1D], float b[LEN_1D]) {
    for (int i = 0; i < LEN_1D; i++)
        a[i] = a[LEN_1D / 2] + b[i];
}

float unidentified_reduction(float a[LEN_1D]) {
    int j = -1;
    for (int i = 0; i < LEN_1D; i++)
        if (a[i] < 0.0f)
            j = i;
    return (float)j;
}

void unknown_bounds(float a[LEN_1D], float b[LEN_1D], int ip[LEN_1D]) {
    for (int i = 0; i < LEN_1D; i++)
        a[ip[i]] = b[i] + 1.0f;
}

void unknown_trip(float a[LEN_1D], float b[LEN_1D], float d[LEN_1D]) {
    for (int i = 0; i < LEN_1D; i++) {
        if (d[i] < 0.0f) return;
        a[i] += b[i];
    }
}

void unvectorizable_call(float a[LEN_1D], float b[LEN_1D]) {
    for (int i = 0; i < LEN_1D; i++)
        a[i] = opaque(b[i]);
}

void switch_loop(float a[LEN_1D], float b[LEN_1D], int k[LEN_1D]) {
    for (int i = 0; i < LEN_1D; i++) {
        switch (k[i]) {
            case 1: a[i] += b[i]; break;
            case 2: a[i] -= b[i]; break;
            default: a[i] = 0.0f; break;
        }
    }
}

void recurrence(float a[LEN_1D], float b[LEN_1D]) {
    for (int i = 1; i < LEN_1D; i++)
        a[i] = a[i - 1] + b[i];
}

float sum_reduce(float a[LEN_1D]) {
    float s = 0.0f;
    for (int i = 0; i < LEN_1D; i++)
        s += a[i];
    return s;
}

void nested(float aa[LEN_2D][LEN_2D], float bb[LEN_2D][LEN_2D]) {
    for (int i = 1; i < LEN_2D; i++)
        for (int j = 0; j < LEN_2D; j++)
            aa[i][j] = aa[i - 1][j] + bb[i][j];
}

void wavefront(float aa[LEN_2D][LEN_2D]) {
    for (int i = 1; i < LEN_2D; i++)
        for (int j = 1; j < LEN_2D; j++)
            aa[i][j] = aa[i - 1][j - 1] + aa[i][j - 1];
}

void goto_loop(float a[LEN_1D], float b[LEN_1D], float c[LEN_1D]) {
    for (int i = 0; i < LEN_1D - 1; ++i) {
        if (c[i] < 0.0f) goto skip;
        a[i] = c[i] * b[i];
skip:
        ;
    }
}

void packing(float a[LEN_1D], float b[LEN_1D]) {
    int j = -1;
    for (int i = 0; i < LEN_1D; i++) {
        if (b[i] > 0.0f) {
            j++;
            a[j] = b[i];
        }
    }
}

void int_shift(int a[LEN_1D], int b[LEN_1D]) {
    for (int i = 0; i < LEN_1D; i++)
        a[i] = b[i] << 2;
}

void backward_dep(float a[LEN_1D], float b[LEN_1D]) {
    for (int i = LEN_1D - 2; i >= 0; i--)
        a[i + 1] = a[i] + b[i];
}
