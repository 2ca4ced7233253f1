/* does not compile */
int main(void) {
    float a[N], b[N]
    return dot(a, b) != dot_opt(a, b);
}
