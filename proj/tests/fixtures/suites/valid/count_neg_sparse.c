static uint64_t st = 0xC0FFEE;
static uint64_t nx(void) { st ^= st >> 12; st ^= st << 25; st ^= st >> 27; return st * 2685821657736338717ULL; }

int main(void) {
    int v[N];
    for (int t = 0; t < 200; t++) {
        for (int i = 0; i < N; i++) v[i] = (nx() % 10 == 0) ? -(int)(nx() % 5) - 1 : (int)(nx() % 9);
        int e = count_neg(v), a = count_neg_opt(v);
        if (e != a) {
            printf("TRIAL %d PARAM return EXPECTED %d ACTUAL %d\n", t, e, a);
            exit(1);
        }
    }
    return 0;
}
