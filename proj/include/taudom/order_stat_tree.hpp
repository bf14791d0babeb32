#ifndef TAUDOM_ORDER_STAT_TREE_HPP
#define TAUDOM_ORDER_STAT_TREE_HPP

#include <cstdint>
#include <utility>

namespace taudom {

/*
 * AVL multiset with subtree sizes.  Supports the three operations the
 * counting layer needs: insert, erase-one, and rank (number of keys below a
 * bound), each in O(log n).  Keys only need operator<.
 */
template <typename Key>
class OrderStatTree {
public:
    OrderStatTree() = default;
    ~OrderStatTree() { destroy(root_); }

    OrderStatTree(OrderStatTree&& o) noexcept : root_(o.root_) { o.root_ = nullptr; }
    OrderStatTree& operator=(OrderStatTree&& o) noexcept {
        if (this != &o) {
            destroy(root_);
            root_ = o.root_;
            o.root_ = nullptr;
        }
        return *this;
    }
    OrderStatTree(const OrderStatTree&) = delete;
    OrderStatTree& operator=(const OrderStatTree&) = delete;

    std::size_t size() const { return node_size(root_); }
    bool empty() const { return root_ == nullptr; }

    void insert(const Key& k) { root_ = insert(root_, k); }

    // removes one occurrence; false when the key is absent
    bool erase_one(const Key& k) {
        bool erased = false;
        root_ = erase(root_, k, erased);
        return erased;
    }

    // number of stored keys strictly below k
    std::size_t count_lt(const Key& k) const {
        std::size_t acc = 0;
        const Node* t = root_;
        while (t) {
            if (t->key < k) {
                acc += node_size(t->left) + 1;
                t = t->right;
            } else {
                t = t->left;
            }
        }
        return acc;
    }

    // number of stored keys <= k
    std::size_t count_le(const Key& k) const {
        std::size_t acc = 0;
        const Node* t = root_;
        while (t) {
            if (k < t->key) {
                t = t->left;
            } else {
                acc += node_size(t->left) + 1;
                t = t->right;
            }
        }
        return acc;
    }

    // keys in the closed range [lo, hi]
    std::size_t count_range(const Key& lo, const Key& hi) const {
        if (hi < lo) return 0;
        return count_le(hi) - count_lt(lo);
    }

    bool contains(const Key& k) const {
        const Node* t = root_;
        while (t) {
            if (k < t->key)
                t = t->left;
            else if (t->key < k)
                t = t->right;
            else
                return true;
        }
        return false;
    }

    // smallest stored key >= k; false when none exists
    bool lower_bound(const Key& k, Key& out) const {
        const Node* t = root_;
        const Node* best = nullptr;
        while (t) {
            if (t->key < k) {
                t = t->right;
            } else {
                best = t;
                t = t->left;
            }
        }
        if (!best) return false;
        out = best->key;
        return true;
    }

    void clear() {
        destroy(root_);
        root_ = nullptr;
    }

private:
    struct Node {
        Key key;
        Node* left = nullptr;
        Node* right = nullptr;
        std::int32_t height = 1;
        std::size_t size = 1;
        explicit Node(const Key& k) : key(k) {}
    };

    Node* root_ = nullptr;

    static std::size_t node_size(const Node* t) { return t ? t->size : 0; }
    static std::int32_t node_height(const Node* t) { return t ? t->height : 0; }

    static void pull(Node* t) {
        t->size = node_size(t->left) + node_size(t->right) + 1;
        t->height = 1 + std::max(node_height(t->left), node_height(t->right));
    }

    static Node* rotate_right(Node* y) {
        Node* x = y->left;
        y->left = x->right;
        x->right = y;
        pull(y);
        pull(x);
        return x;
    }

    static Node* rotate_left(Node* x) {
        Node* y = x->right;
        x->right = y->left;
        y->left = x;
        pull(x);
        pull(y);
        return y;
    }

    static Node* balance(Node* t) {
        pull(t);
        const std::int32_t bf = node_height(t->left) - node_height(t->right);
        if (bf > 1) {
            if (node_height(t->left->left) < node_height(t->left->right))
                t->left = rotate_left(t->left);
            return rotate_right(t);
        }
        if (bf < -1) {
            if (node_height(t->right->right) < node_height(t->right->left))
                t->right = rotate_right(t->right);
            return rotate_left(t);
        }
        return t;
    }

    static Node* insert(Node* t, const Key& k) {
        if (!t) return new Node(k);
        if (k < t->key)
            t->left = insert(t->left, k);
        else
            t->right = insert(t->right, k);
        return balance(t);
    }

    static Node* detach_min(Node* t, Node*& min_out) {
        if (!t->left) {
            min_out = t;
            return t->right;
        }
        t->left = detach_min(t->left, min_out);
        return balance(t);
    }

    static Node* erase(Node* t, const Key& k, bool& erased) {
        if (!t) return nullptr;
        if (k < t->key) {
            t->left = erase(t->left, k, erased);
        } else if (t->key < k) {
            t->right = erase(t->right, k, erased);
        } else {
            erased = true;
            Node* l = t->left;
            Node* r = t->right;
            delete t;
            if (!r) return l;
            Node* m = nullptr;
            r = detach_min(r, m);
            m->left = l;
            m->right = r;
            return balance(m);
        }
        return balance(t);
    }

    static void destroy(Node* t) {
        if (!t) return;
        destroy(t->left);
        destroy(t->right);
        delete t;
    }
};

} // namespace taudom

#endif
