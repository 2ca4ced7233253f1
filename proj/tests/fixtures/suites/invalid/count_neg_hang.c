/* never terminates */
int main(void) {
    int v[N];
    for (int i = 0; i < N; i++) v[i] = i - 100;
    volatile int spin = 1;
    while (spin) {
        if (count_neg(v) != count_neg_opt(v)) {
            printf("TRIAL 0 PARAM return EXPECTED 0 ACTUAL 1\n");
            exit(1);
        }
        spin = 1;
    }
    return 0;
}
